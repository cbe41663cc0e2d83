"""Infinitely divisible random measures, kernel-integral fields and their characteristic functions."""

from .basis import (
    CharacteristicTriplet, JumpComponent, SpatialIntensity, Window,
    control_measure, cumulant_marginal, drift_of_set, gaussian_of_set, levy_of_set, scale,
)
from .charfn import (
    CfReport, CumulantRequest, SpatialQuadrature, cf_joint, cf_pow, characteristic_function,
    combined_drift, combined_gaussian, cumulant_joint, jump_cumulant,
)
from .errors import ConfigurationError, DivergenceError, DomainError, IdFieldError, QuadratureError
from .kernels import Box, Discretized, ExpDecay, GaussianBump, Tabulated, WeightedCombination, integrability_check
from .levy import CompoundDensity, DiscreteJumps, GammaType, JumpLaw, levy_integral, lk_integral
from .simulate import (
    FieldSample, GridDiscretization, SimulationConfig, simulate_field, simulate_id_sum,
)
from .verify import (
    VerificationReport, VerificationSettings, empirical_cf, ks_two_sample, psd_check,
    verify_infinite_divisibility,
)

__version__ = "0.1.0"
