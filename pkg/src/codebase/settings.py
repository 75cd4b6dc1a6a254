DEBUG = "false"

# required non-empty by eva.conf.Settings; unused by the lab
SECRET_KEY = "volterra-lab"

# http://docs.sqlalchemy.org/en/latest/core/engines.html
DB_URI = "sqlite://"
RECORD_RUNS = "false"
MODELS_MODULE = "codebase.models"

# default output directory of CSV / JSON artifacts
OUTPUT_DIR = "output"

# plain doubles by default, log-magnitude + sign when "true"
LOG_DOMAIN = "false"

ENSEMBLE_WORKERS = "1"

# spectral
TOL_ROOT = "1e-9"
TOL_SINGULAR = "1e-12"

# solver cross-checks
TOL_RELATIVE = "1e-10"

# limsup estimation
LIMSUP_BURN_IN = "0.25"
LIMSUP_ZERO_FRACTION = "1e-3"
LIMSUP_GROWTH_FACTOR = "2.0"
LAMBDA_IQR = "1e-3"
FLUCT_SLACK = "0.05"

# super-slow variation certificate, mu(x) = log^beta(x)
SSV_TOLERANCE = "0.02"
SSV_BETA = "2.0"
SSV_DELTA = "0.6"

# rows listed by `manage.py history`
HISTORY_LIMIT = "20"
