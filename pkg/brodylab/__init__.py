# Geometry
from .geometry.projective import ProjectivePoint, fs_distance, fs_spanning_set
from .geometry.curves import (Constant, LatticeSum, Rational, Square, evaluate, glue, local_lipschitz, rescale,
                              translate)
from .geometry.energy import energy_density, energy_integral, nsa_characteristic, psi, psi1, psi2

# Verification
from .verification.certificates import brody_verify, nondegeneracy_check

# Dynamics
from .dynamics.curve_space import CurveEnsemble, DynMetricSpec, metric_comparison_check, metric_eval
from .dynamics.covering import covering_number, covering_number_with_potential, tame_growth_profile
from .dynamics.measures import (FamilyParams, LatticeFamily, PeriodicOrbit, PointMass, TranslatedAverage,
                                design_rescaling, ergodic_average_check, expectation, invariance_test,
                                sample_curve)

# Information
from .information.entropy import DistortionMatrix, JointPmf, Pmf, entropy, mutual_information
from .information.rate_distortion import RDEstimate, blahut_arimoto, rd_brute_force, rd_curve, rdim_slope
from .information.dynamical import dynamical_rd_estimate, kawabata_dembo_check

# Lab
from .lab.config import ExperimentConfig
from .lab.experiments import run_experiment

# Version info
__version__ = '1.0.0'

# The __all__ list defines the public API of the module and controls what is imported
# when 'from module import *' is used.
__all__ = [
    'Constant',
    'CurveEnsemble',
    'DistortionMatrix',
    'DynMetricSpec',
    'ExperimentConfig',
    'FamilyParams',
    'JointPmf',
    'LatticeFamily',
    'LatticeSum',
    'PeriodicOrbit',
    'Pmf',
    'PointMass',
    'ProjectivePoint',
    'RDEstimate',
    'Rational',
    'Square',
    'TranslatedAverage',
    'blahut_arimoto',
    'brody_verify',
    'covering_number',
    'covering_number_with_potential',
    'design_rescaling',
    'dynamical_rd_estimate',
    'energy_density',
    'energy_integral',
    'entropy',
    'ergodic_average_check',
    'evaluate',
    'expectation',
    'fs_distance',
    'fs_spanning_set',
    'glue',
    'invariance_test',
    'kawabata_dembo_check',
    'local_lipschitz',
    'metric_comparison_check',
    'metric_eval',
    'mutual_information',
    'nondegeneracy_check',
    'nsa_characteristic',
    'psi',
    'psi1',
    'psi2',
    'rd_brute_force',
    'rd_curve',
    'rdim_slope',
    'rescale',
    'run_experiment',
    'sample_curve',
    'tame_growth_profile',
    'translate',
]
