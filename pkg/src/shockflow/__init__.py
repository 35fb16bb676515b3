"""Fund-flow driven stock shock/recovery model with EMD time-scale analysis."""

__version__ = "0.1.0"

from .antifragility import FinancialStatement, company_phi, sector_phi
from .fund_flow import (
    DEFAULT_REGIMES,
    DailyInstitutionalFlow,
    RegimeSpec,
    generate_synthetic_flow,
    net_flow,
    normalize_flow,
)
from .hht import emd_decompose, hilbert_transform, mean_period
from .phases import Phase, PhaseSchedule, PhaseSpec
from .price_model import Scenario, simulate, step_price, sweep
from .scale_analysis import analyze_series, dominance_table, shock_recovery_timescales

__all__ = [
    "DEFAULT_REGIMES", "DailyInstitutionalFlow", "FinancialStatement", "Phase", "PhaseSchedule",
    "PhaseSpec", "RegimeSpec", "Scenario", "analyze_series", "company_phi", "dominance_table",
    "emd_decompose", "generate_synthetic_flow", "hilbert_transform", "mean_period", "net_flow",
    "normalize_flow", "sector_phi", "shock_recovery_timescales", "simulate", "step_price", "sweep",
]
