"""The two worked example channels, built in code."""

import numpy as np

from .channel import ChannelTensor, Dmc, compose_zic, deterministic_channel

EX1_PY2_GIVEN_X2 = np.array([[0.1, 0.9], [0.9, 0.1]])
# rows indexed x1 * |Y2| + y2: pairs 00 and 11 share one law, 01 and 10 the other
EX1_PY1_GIVEN_X1Y2 = np.array([[0.75, 0.25], [0.0, 1.0], [0.0, 1.0], [0.75, 0.25]])


def example1() -> ChannelTensor:
    """Binary one-sided channel with weak interference (factorised form)."""
    return compose_zic(Dmc(EX1_PY2_GIVEN_X2), Dmc(EX1_PY1_GIVEN_X1Y2))


def example2() -> ChannelTensor:
    """Deterministic binary channel ``Y1 = X1 X2``, ``Y2 = X1 xor X2``."""
    return deterministic_channel(lambda a, b: a * b, lambda a, b: a ^ b, 2, 2, 2, 2)


def example1_file_dict() -> dict:
    return {
        "p_y2_given_x2": EX1_PY2_GIVEN_X2.tolist(),
        "p_y1_given_x1y2": EX1_PY1_GIVEN_X1Y2.tolist(),
    }
