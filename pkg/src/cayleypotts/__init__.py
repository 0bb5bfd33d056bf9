"""Lee-Yang zeros and renormalisation dynamics of the q-state Potts model on Cayley trees."""
from .complexpoly import ComplexPoly, NonConvergence, find_roots
from .criticality import (
    AccumulationSet,
    OutOfRange,
    accumulation_points,
    n_minus,
    n_plus,
    q1_antiferro,
    q2_antiferro,
    q_ferro,
    t1,
    t2,
    t3,
    t_bethe_peierls,
    t_wangwu,
    zc_ferro,
    zc_pm,
    zc_pm_ising,
)
from .leeyang import ZeroSet, accumulation_check, compute_zeros, read_zeros_csv, write_zeros_csv
from .locus import LocusImage, PixelClass, RenderSettings, classify_pixel, render, write_image
from .oracle import brute_partition, build_tree
from .partition import TreeKind, TreeSpec, conditional_pair, partition_eval, partition_poly
from .renorm import (
    INF,
    DegenerateMap,
    OrbitKind,
    Params,
    Stability,
    fixed_points,
    iterate,
    orbit_limit,
    renorm_dw,
    renorm_eval,
    renorm_unrooted_eval,
)

__version__ = "0.1.0"
