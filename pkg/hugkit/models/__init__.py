"""
Domain models: point configurations, labels, labeled states, proxy sets
and optimizer trajectories.
"""
from hugkit.models.geometry import Labels, PointConfig, RawMatrix
from hugkit.models.proxy_set import ProxySet, ProxyStrategy
from hugkit.models.state import LabeledState
from hugkit.models.trajectory import Trajectory, TrajectoryRecord

__all__ = [
    "Labels", "PointConfig", "RawMatrix",
    "ProxySet", "ProxyStrategy",
    "LabeledState",
    "Trajectory", "TrajectoryRecord",
]
