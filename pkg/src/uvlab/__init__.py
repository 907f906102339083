"""V- and U-statistics through integration by parts against signed measures."""

__version__ = "0.1.0"

from .distributions import FivePoint, Normal, StandardNormal, TwoPoint, Uniform, get_distribution
from .empirical import EmpiricalDiff, Sample, u_statistic, v_statistic, weighted_sup_distance
from .kernels import CATALOGUE, Kernel, make_kernel, v_true
from .decomposition import classify_degeneracy, verify_representation
from .longmem import LongMemoryConfig, appell_basis, corrected_vstat, simulate_linear_process
from .limits import bridge_functional_law, longmem_limit_law, simulate_Z

__all__ = [
    "CATALOGUE", "EmpiricalDiff", "FivePoint", "Kernel", "LongMemoryConfig", "Normal", "Sample",
    "StandardNormal", "TwoPoint", "Uniform", "appell_basis", "bridge_functional_law",
    "classify_degeneracy", "corrected_vstat", "get_distribution", "longmem_limit_law",
    "make_kernel", "simulate_Z", "simulate_linear_process", "u_statistic", "v_statistic",
    "v_true", "verify_representation", "weighted_sup_distance",
]
