import logging
import sys
from logging.handlers import RotatingFileHandler
import os

from app.core.config import settings

def setup_logging():
    """
    Central logging configuration for the walk simulator.
    Console output goes to stdout so that successful CLI runs leave stderr empty;
    a rotating log file is kept under LOG_DIR unless LOG_TO_FILE is off.
    """
    logger = logging.getLogger("qwalk")
    logger.setLevel(getattr(logging, settings.LOG_LEVEL.upper(), logging.INFO))

    # Prevent duplicate logs if already configured
    if logger.handlers:
        return logger

    formatter = logging.Formatter(
        '%(asctime)s - %(name)s - %(levelname)s - %(filename)s:%(lineno)d - %(message)s'
    )

    console_handler = logging.StreamHandler(sys.stdout)
    console_handler.setFormatter(formatter)
    logger.addHandler(console_handler)

    if settings.LOG_TO_FILE:
        os.makedirs(settings.LOG_DIR, exist_ok=True)
        file_handler = RotatingFileHandler(
            os.path.join(settings.LOG_DIR, settings.LOG_FILE),
            maxBytes=10*1024*1024, backupCount=5
        )
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)

    return logger

# Initialize on import
logger = setup_logging()
