# Make the syndetic directory a proper Python package
# Export the main decision procedures
from .engine import decide_fractionally_thick, decide_n_syndetic
from .groups import parse_group
from .reports import DecisionReport, Verdict
from .sets import load_set
from .strong import build_scs_certificate, verify_scs_certificate
from .symmetric import dense_orbit_finite_exact, dense_orbit_via_symmetric, symmetric_syndetic
