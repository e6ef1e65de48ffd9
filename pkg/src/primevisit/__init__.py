"""primevisit: early prime clusters in arithmetic progressions and
prime-time recurrence in metric-measure-preserving systems."""

__version__ = "0.1.0"

from .primes import PrimeRange, is_prime, primes_in_ap, sieve_range
from .clusters import (
    AdmissibleTuple,
    PrimeClusterResult,
    Progression,
    cluster_census,
    is_admissible,
    min_pm,
    narrowest_tuple,
    pm,
    theorem11_report,
)
from .sieve_weights import (
    CutoffF,
    PiecewiseLinear,
    SieveParams,
    SSumReport,
    choose_b0,
    cutoff_value,
    detection_ratio,
    discrepancy_reduced,
    lambda_f,
    s_sum_bruteforce,
    select_k_rho,
    singular_I,
    singular_J,
    small_primorial_coprime,
    weight,
)
from .contfrac import (
    ContinuedFraction,
    RealNumberSpec,
    ReturnTimeReport,
    cf_expand,
    check_prop71,
    return_time,
    return_time_bruteforce,
    type_estimate,
)
from .dynamics import (
    EarlyVisitCertificate,
    MMPSystem,
    UnimodularMatrix,
    UpperHalfPoint,
    early_visit_search,
    first_return,
    hyp_distance,
    kac_empirical,
    make_mobius,
    make_right_shift,
    make_rotation,
    prime_visit_times,
    quotient_distance,
    reduce_fundamental,
    verify_certificate,
)
