"""Test cases for fabula rich logging functionality."""

import logging
from unittest.mock import patch

from fabula.cli.logging import (get_progress, init_logging, log_error,
                                log_info, log_run_header, log_success,
                                log_warning, status)


def test_log_info():
    """Test info logging with rich formatting."""
    with patch('fabula.cli.logging.console.print') as mock_print:
        log_info("Test message")
        mock_print.assert_called_once_with("[info]Test message[/info]")


def test_log_success():
    """Test success logging with rich formatting."""
    with patch('fabula.cli.logging.console.print') as mock_print:
        log_success("Test message")
        mock_print.assert_called_once_with("[success]Test message[/success]")


def test_log_warning():
    """Test warning logging with rich formatting."""
    with patch('fabula.cli.logging.console.print') as mock_print:
        log_warning("Test message")
        mock_print.assert_called_once_with("[warning]Test message[/warning]")


def test_log_error():
    """Test error logging with rich formatting."""
    with patch('fabula.cli.logging.console.print') as mock_print:
        log_error("Test message")
        mock_print.assert_called_once_with("[error]Test message[/error]")


def test_log_error_escapes_markup():
    """Test stage tags in messages are printed literally."""
    with patch('fabula.cli.logging.console.print') as mock_print:
        log_error("[fill] empty reference")
        mock_print.assert_called_once_with("[error]\\[fill] empty reference[/error]")


def test_log_run_header():
    """Test the run header carries the command, config hash and seed."""
    with patch('fabula.cli.logging.console.print') as mock_print, \
         patch('fabula.cli.logging.logger') as mock_logger:
        log_run_header("train", "abc123def456", 7)
        mock_logger.info.assert_called_once_with("%s: config=%s seed=%d", "train", "abc123def456", 7)
        mock_print.assert_called_once_with("[stage]train[/stage] config=abc123def456 seed=7")


def test_get_progress():
    """Test progress bar creation."""
    progress = get_progress()
    assert progress is not None
    assert hasattr(progress, 'add_task')


def test_status():
    """Test status message creation."""
    with patch('fabula.cli.logging.console.status') as mock_status:
        status("Test status")
        mock_status.assert_called_once_with("Test status", spinner="dots")


def test_init_logging():
    """Test logging initialization."""
    with patch('fabula.cli.logging.logger') as mock_logger:
        init_logging(debug=True)
        mock_logger.setLevel.assert_called_once()


def test_init_logging_sets_handler_levels():
    """Test the rich handler follows the debug flag."""
    init_logging(debug=True)
    assert all(handler.level == logging.DEBUG for handler in logging.getLogger().handlers)
    init_logging(debug=False)
    assert logging.getLogger("fabula").level == logging.INFO
