"""Reference triplets used by the test-suite, the acceptance run and the shipped configs."""

from __future__ import annotations

from .basis import CharacteristicTriplet, JumpComponent, SpatialIntensity, Window
from .levy import CompoundDensity, DiscreteJumps, GammaType, JumpLaw


def zero_triplet(window=None):
    return CharacteristicTriplet(window or Window.unit(1))


def gaussian_triplet(window=None, variance_density=1.0):
    return CharacteristicTriplet(window or Window.unit(1), gaussian=SpatialIntensity.constant(variance_density))


def discrete_triplet(window=None, pairs=((2.0, 1.0),)):
    return CharacteristicTriplet(
        window or Window.unit(1),
        jumps=(JumpComponent(DiscreteJumps.from_pairs(pairs), SpatialIntensity.constant(1.0)),),
    )


def gamma_triplet(window=None, c=1.0, beta=1.0):
    return CharacteristicTriplet(
        window or Window.unit(1),
        jumps=(JumpComponent(GammaType(c, beta), SpatialIntensity.constant(1.0)),),
    )


def compound_triplet(window=None):
    """Drift, Gaussian part and normally distributed jumps together."""
    return CharacteristicTriplet(
        window or Window.unit(1),
        drift=SpatialIntensity.constant(0.2),
        gaussian=SpatialIntensity.constant(0.25),
        jumps=(JumpComponent(CompoundDensity(2.0, JumpLaw("norm", {"loc": 0.3, "scale": 0.5})),
                             SpatialIntensity.constant(1.0)),),
    )


def catalog(window=None):
    """Name -> triplet for every jump family plus the pure Gaussian case."""
    return {
        "gaussian": gaussian_triplet(window),
        "discrete": discrete_triplet(window),
        "gamma": gamma_triplet(window),
        "compound": compound_triplet(window),
    }
