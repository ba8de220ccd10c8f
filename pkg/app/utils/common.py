from builtins import BaseException, str
import logging
import logging.config
import os
import tempfile
from app.dependencies import get_settings

settings = get_settings()
def setup_logging():
    """
    Sets up logging for the application using a configuration file.
    This ensures standardized logging across the entire application.
    """
    # Construct the path to 'logging.conf', assuming it's in the project's root.
    logging_config_path = os.path.join(os.path.dirname(__file__), '..', '..', 'logging.conf')
    # Normalize the path to handle any '..' correctly.
    normalized_path = os.path.normpath(logging_config_path)
    if os.path.exists(normalized_path):
        logging.config.fileConfig(normalized_path, disable_existing_loggers=False)
    else:
        logging.basicConfig(level=logging.WARNING)
    level = logging.DEBUG if settings.debug else settings.log_level.upper()
    logging.getLogger("app").setLevel(level)


def write_atomic(path: str, text: str) -> None:
    """Write ``text`` to ``path`` through a temporary sibling file, so readers never see a partial file."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp_path = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.remove(tmp_path)
        raise
