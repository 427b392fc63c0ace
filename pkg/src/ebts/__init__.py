"""Day-ahead scheduling of an electric boiler with thermal storage (EBTS).

The toolkit models forecast-vs-actual outdoor-temperature dependence with a
copula, samples conditional temperature scenarios reduced by K-means, and
solves a two-stage stochastic LP that trades energy cost, balancing revenue,
and deviation penalties.
"""

__version__ = "0.1.0"

from . import config, copulas, errors, evaluation, lp, model, scenarios, special, weather
from .config import CaseConfig, ScenarioSettings, default_case, load_case_config
from .copulas import (
    CopulaFamily,
    EmpiricalMarginal,
    FittedCopula,
    bic,
    conditional_cdf,
    copula_density,
    fit_copula,
    fit_from_series,
    fit_marginal,
    kendall_tau,
    load_copula,
    log_likelihood,
    pseudo_observations,
    sample_conditional,
    save_copula,
    select_family,
)
from .evaluation import (
    ComparisonReport,
    RealizedResult,
    compare_methods,
    realized_dispatch,
    synthetic_history,
    synthetic_test_days,
)
from .lp import LinearProgram, LpSolution, LpStatus, solve, to_mps
from .model import (
    BuildingParams,
    MarketParams,
    PlantParams,
    ScheduleSolution,
    build_deterministic_lp,
    build_stochastic_lp,
    extract_schedule,
    radiator_theta,
)
from .scenarios import (
    ElbowResult,
    KMeansResult,
    SamplePool,
    ScenarioSet,
    elbow_select,
    kmeans,
    sample_profiles,
    to_scenario_set,
)
from .weather import (
    DayForecast,
    PairedSeries,
    TemperatureObservation,
    parse_temperature_csv,
    resample_hourly,
    split_heating_seasons,
)
