"""Symbolic calculus for pseudodifferential operators in several variables.

Exact-rational engine for the Leibniz product, adjoints, residues and
plus/minus splits of window-truncated operators; dressing and Lax /
zero-curvature consistency checking with PDE extraction; Miwa-type shifts,
residue lemmas, and the tau-to-wave-function expansion.
"""

from .diffpoly import DiffPoly, JetVariable, TimePolynomial, jet
from .errors import (
    AnsatzError,
    DimensionError,
    ParseError,
    PoleError,
    PsdoCalcError,
    RulesError,
    TruncationError,
    UnsupportedIndexError,
    WindowError,
)
from .hierarchy import (
    CheckResult,
    FlowRules,
    LaxTuple,
    PdeSystem,
    dress,
    extract_pdes,
    lax_check,
    reduce_system,
    w4_rules,
    zero_jet_substitutions,
    zs_check,
)
from .psdop import PsdOp, commutator, power_multi
from .tau import (
    TauContext,
    dk_annihilation_check,
    dk_apply,
    geometric_inverse,
    kernel_vs_geometric,
    lemma41_check,
    lemma42_check,
    miwa_shift,
    miwa_shift_series,
    r1_check_n1,
    shift_kernel,
    wavehat_from_tau,
)
from .wave import (
    GroupTrunc,
    LaurentSeries,
    WaveSymbol,
    adjoint_baker,
    apply_to_wave,
    baker_from_phi,
    bilinear_check,
    pair_residue_check,
    res_z,
    series_exp,
    series_inverse,
    symbol_of,
    wave_exponential,
)

__version__ = "0.1.0"
