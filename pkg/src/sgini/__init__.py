"""Estimation, confidence intervals and tests for S-Gini inequality indices."""

__version__ = "0.1.0"

from .bootstrap import BootstrapConfig, bcel_interval, boot_t_interval
from .el import (constraint_values, el_interval, el_log_ratio, el_root, solve_lambda,
                 variance_estimates)
from .errors import (CalibrationError, DataError, InsufficientSampleError, OracleSizeError,
                     ParameterDomainError, SGiniError)
from .estimators import (EstimateResult, empirical_survival_ranks, estimate, gmd_and_gini,
                         plug_in_absolute, plug_in_relative, ustat_absolute, ustat_brute_force,
                         ustat_relative)
from .io import DataFile, load_csv
from .jel import jel_interval, jel_log_ratio, jel_test, loo_ustats, pseudo_values
from .results import IntervalResult
from .sample import SGiniOrder, Sample
from .simulation import (DistributionSpec, SimReport, coverage_study, sample_distribution,
                         true_r_nu, type1_power_study)
