"""Critical rank-k approximations of binary forms."""

from .critical import (
    BudgetExhausted,
    CollapsedDirections,
    CriticalRank1,
    CriticalRankK,
    DegenerateCircle,
    DegenerateInput,
    Hyperplane,
    SearchBudget,
    ZeroForm,
    best_rank_k,
    certify,
    count_real,
    critical_rank_k,
    critical_rank_one,
    eigen_pairs,
    singular_space,
)
from .forms import (
    BinaryForm,
    DegreeMismatch,
    LengthMismatch,
    LinearForm,
    apply_D,
    bombieri_dot,
    circle_power,
    contract,
    norm,
    perp,
    power,
    split_dot,
)
from .roots import ProjectiveRootSet, roots
from .spectral import express_in_eigenbasis, rez, spectral_decompose

__version__ = "0.1.0"
