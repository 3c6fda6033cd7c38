"""
Centralized logging configuration for the entire toolkit
Console + per-component file output with log location tracking
"""
import logging
import sys
from datetime import datetime
from config.settings import LOGS_DIR, LOG_LEVEL, LOG_TO_FILE


class ProjectLogger:
    """Centralized logger configuration"""

    _initialized = False
    _log_files = {}  # component -> log file path

    @classmethod
    def setup_logging(cls, component_name: str = "main") -> logging.Logger:
        """
        Setup logging for a component with unified configuration

        Args:
            component_name: Name of the component (e.g., 'audio_codec', 'optimizer_core', 'cli')

        Returns:
            Configured logger instance
        """
        logger = logging.getLogger(f"stego_hawk.{component_name}")

        # Avoid duplicate handlers
        if logger.handlers:
            return logger

        logger.setLevel(getattr(logging, LOG_LEVEL.upper(), logging.INFO))
        logger.propagate = False

        # Console goes to stderr: stdout carries reports and summaries
        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setLevel(logging.WARNING)
        console_handler.setFormatter(logging.Formatter(
            '%(asctime)s - %(name)s - %(levelname)s - %(message)s',
            datefmt='%H:%M:%S'
        ))
        logger.addHandler(console_handler)

        if LOG_TO_FILE:
            try:
                LOGS_DIR.mkdir(parents=True, exist_ok=True)
                log_file = LOGS_DIR / f"{component_name}.log"
                file_handler = logging.FileHandler(log_file, encoding='utf-8')
                file_handler.setLevel(logging.DEBUG)
                file_handler.setFormatter(logging.Formatter(
                    '%(asctime)s - %(name)s - %(levelname)s - %(filename)s:%(lineno)d - %(message)s'
                ))
                logger.addHandler(file_handler)
                cls._log_files[component_name] = log_file
            except OSError as e:
                logger.warning(f"File logging disabled for {component_name}: {e}")

        if not cls._initialized:
            logger.info("Logging system initialized")
            logger.info(f"Logs directory: {LOGS_DIR}")
            logger.info(f"Log level: {LOG_LEVEL}")
            cls._initialized = True

        logger.debug(f"Logger configured for component: {component_name}")
        return logger

    @classmethod
    def set_console_level(cls, level: str) -> None:
        """Raise or lower console verbosity for every configured component"""
        numeric = getattr(logging, level.upper(), logging.WARNING)
        names = [name for name in logging.root.manager.loggerDict if name.startswith("stego_hawk.")]
        for logger in (logging.getLogger(name) for name in names):
            for handler in logger.handlers:
                if isinstance(handler, logging.StreamHandler) and not isinstance(handler, logging.FileHandler):
                    handler.setLevel(numeric)
            if numeric < logger.level:
                logger.setLevel(numeric)

    @classmethod
    def get_log_files_info(cls) -> dict:
        """Get information about all log files"""
        info = {
            "logs_directory": str(LOGS_DIR),
            "log_files": {}
        }

        for component, log_file in cls._log_files.items():
            if log_file.exists():
                stat = log_file.stat()
                info["log_files"][component] = {
                    "path": str(log_file),
                    "size_bytes": stat.st_size,
                    "modified": datetime.fromtimestamp(stat.st_mtime).isoformat()
                }

        return info


def get_logger(component_name: str) -> logging.Logger:
    """
    Convenience function to get a configured logger

    Usage:
        from src.logger_config import get_logger
        logger = get_logger('stego_engine')
        logger.info("This is logged!")
    """
    return ProjectLogger.setup_logging(component_name)
