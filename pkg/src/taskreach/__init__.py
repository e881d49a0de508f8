"""taskreach: choose robot base configurations that reach task goal-pose sets.

Library layout mirrors the pipeline: geometry and kinematics primitives,
dexterity metrics, declarative scene/task models, configuration-set scoring,
CMA-ES search, capability-map baselines, the offline/online selector, and the
Monte-Carlo robustness harness. The `taskreach` CLI ties the stages together.
"""

from .backend import BACKEND

__version__ = "0.1.0"
__all__ = ["BACKEND", "__version__"]
