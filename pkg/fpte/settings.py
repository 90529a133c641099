# Runtime settings for fpte
#
# Values come from the environment (or a local .env file) so scenario runs can be
# redirected without editing scenario configs.

import logging
import os
from dotenv import load_dotenv

load_dotenv()

OUTPUT_DIR = os.getenv("FPTE_OUTPUT_DIR", "output")

# Run ledger; None means a sqlite file inside the output directory
DATABASE_URL = os.getenv("FPTE_DATABASE_URL")

# Set log level
LOG_LEVEL = os.getenv("FPTE_LOG_LEVEL", "INFO")
LOG_FORMAT = "%(asctime)s [%(name)s] %(levelname)s: %(message)s"

# Worker cap for Monte Carlo blocks and coefficient tabulation
THREADS = int(os.getenv("FPTE_THREADS", "1"))

logging.getLogger("sqlalchemy.engine").setLevel(logging.WARNING)
