"""
Constants and configuration values for the D-module verification engine.
Centralizes hard limits, exit codes, grammar patterns, report keys and styling.
"""

# ============================================================================
# GRAMMAR PATTERNS
# ============================================================================

PATTERN_IDENTIFIER = r'[a-zA-Z][a-zA-Z0-9_]*'
PATTERN_INTEGER = r'\d+'
PATTERN_DERIVATION = r'd_([a-zA-Z][a-zA-Z0-9_]*)'
DERIVATION_PREFIX = 'd_'
SYMBOL_PREFIX = 'xi_'

# Term order used by every canonical form and printer
TERM_ORDER = 'grlex'

# ============================================================================
# HARD LIMITS
# ============================================================================

class Limits:
    """Truncation caps and random-suite sizes."""

    DEGREE_CAP_MAX = 12
    ORDER_CAP_MAX = 4
    DEFAULT_DEGREE_CAP = 8
    DEFAULT_ORDER_CAP = 3

    # Acceptance suite sizes
    DICTIONARY_INSTANCES = 100
    WEYL_INSTANCES = 200
    PULLBACK_INSTANCES = 50
    TRANSFER_INSTANCES = 100
    RANDOM_FAMILIES = 20
    FUNCTORIALITY_PAIRS = 30

    # Random generation bounds
    MAX_RANK = 3
    MAX_COEFF_DEGREE = 3
    MAX_FAMILY_DEGREE = 4
    MAX_FAMILY_BASE_DEGREE = 2
    COEFF_RANGE = 5

    # H0 ansatz: numerator degree bound above deg_x h
    H0_EXTRA_DEGREE = 2

    DEFAULT_SEED = 2024


class ExitCode:
    """Process exit codes partitioning run outcomes."""

    PASS = 0
    CHECK_FAILED = 1
    INPUT_ERROR = 2
    REDUCTION_STUCK = 3

# ============================================================================
# REPORT KEYS
# ============================================================================

class ReportKeys:
    """Field names shared by the report, text and Excel exporters."""

    SUITE = 'suite'
    PASSED = 'passed'
    CHECKS = 'checks'
    NAME = 'name'
    DETAIL = 'detail'
    WITNESS = 'witness'
    CAPS = 'caps'
    SEED = 'seed'
    DISCLAIMER = 'disclaimer'
    CHART_CAVEAT = 'chart_caveat'
    BASIS = 'basis'
    GM_MATRIX = 'gm_matrix'
    ROUTES_AGREE = 'routes_agree'
    PICARD_FUCHS = 'picard_fuchs'
    ROUTES = 'routes'
    E1_CHECK = 'e1_d1_agrees'
    D1_ROUTES = 'd1_routes_agree'
    H0 = 'h0'
    ELAPSED = 'elapsed_seconds'


SATURATION_DISCLAIMER = (
    'Assertions are made only in interior degrees of the truncation; '
    'boundary degrees may differ from the untruncated complex.'
)

CHART_CAVEAT = (
    'Computed on a single product chart: the splitting of the absolute '
    '1-forms into base and fiber parts is the coordinate one and is not '
    'canonical.'
)

# ============================================================================
# EXCEL STYLING COLORS (HEX without #)
# ============================================================================

class ExcelColors:
    """Excel cell colors for the certificate workbook - dark theme."""

    HEADER_FILL = "1A1A1A"
    HEADER_FONT = "00D9FF"

    SUITE_FILL = "1E3A5F"
    SUITE_FONT = "66B3FF"

    DATA_FILL = "2D2D2D"
    DATA_FONT = "FFFFFF"

    PASS_FILL = "1F4E2D"
    PASS_FONT = "90EE90"
    FAIL_FILL = "5A1A1A"
    FAIL_FONT = "FF6B6B"


class ExcelFontSizes:
    """Excel font sizes for different elements."""

    HEADER = 11
    SUITE = 12
    DATA = 10

# ============================================================================
# OUTPUT CONFIGURATION
# ============================================================================

MAX_COLUMN_WIDTH = 60
DEFAULT_COLUMN_PADDING = 2

DEFAULT_OUTPUT_FOLDER = 'output'
EXCEL_FILE_EXTENSION = '.xlsx'

SHEET_SUMMARY = 'Summary'
SHEET_CHECKS = 'Checks'
SHEET_GAUSS_MANIN = 'Gauss_Manin'
SHEET_CERTIFICATES = 'Exactness'
