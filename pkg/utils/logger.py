import logging
import os


def create_logger(logging_dir=None):
    """
    Create a logger that writes to stderr and, when a directory is given, to log.txt in it.
    """
    handlers = [logging.StreamHandler()]
    if logging_dir:
        os.makedirs(logging_dir, exist_ok=True)
        handlers.append(logging.FileHandler(f"{logging_dir}/log.txt"))
    logging.basicConfig(
        level=logging.INFO,
        format='[\033[34m%(asctime)s\033[0m] %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S',
        handlers=handlers,
        force=True,
    )
    logger = logging.getLogger(__name__)
    return logger
