"""Hill and Weissman estimation for norms of discretely observed processes."""

from .estimators import (HillEstimate, LimitLaw, OrderedSample, QuantileEstimate, hill,
                         hill_confidence_interval, hill_plot, limit_law, order_statistics,
                         weissman_quantile)
from .functionals import (ApproxErrorReport, approximation_error, discrete_norm,
                          error_rate_bound, oracle_norm, tradeoff_required_m)
from .harness import (ExperimentConfig, KRule, TailProbRule, ks_test, run_experiment,
                      run_replication, sweep)
from .paths import (PathMatrix, ProcessSpec, ProductSpec, empirical_holder_coefficient,
                    simulate_driver, simulate_product)
from .streams import RandomStream
from .tail_models import TailModel, sample, second_order_aux, tail_quantile

__version__ = "0.1.0"

__all__ = [
    "ApproxErrorReport", "ExperimentConfig", "HillEstimate", "KRule", "LimitLaw",
    "OrderedSample", "PathMatrix", "ProcessSpec", "ProductSpec", "QuantileEstimate",
    "RandomStream", "TailModel", "TailProbRule", "approximation_error", "discrete_norm",
    "empirical_holder_coefficient", "error_rate_bound", "hill", "hill_confidence_interval",
    "hill_plot", "ks_test", "limit_law", "oracle_norm", "order_statistics", "run_experiment",
    "run_replication", "sample", "second_order_aux", "simulate_driver", "simulate_product",
    "sweep", "tail_quantile", "tradeoff_required_m", "weissman_quantile",
]
