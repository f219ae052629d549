"""Sum capacities and outer bounds for two-user discrete memoryless interference channels."""

from .channel import (ChannelTensor, Dmc, JointDistribution, ProductInput, compose_zic,
                      joint_under_input, load_channel, marginal_y1, marginal_y2, validate_channel)
from .classify import (is_mixed, is_one_sided, is_physically_degraded_zic, is_stochastically_degraded,
                       weak_mi_gap)
from .sumcap import grid_oracle, sum_capacity_mixed, sum_capacity_weak

__version__ = "0.1.0"
