"""Tests for the command-line exit codes."""
import json

import pytest
from typer.testing import CliRunner

from main import app
from src.core.constants import ExitCode


@pytest.fixture
def runner():
    return CliRunner()


def test_weyl_passes(runner, tmp_path):
    path = tmp_path / 'weyl.json'
    result = runner.invoke(app, ['weyl', '--count', '2', '--order-cap', '2', '--output', str(path)])
    assert result.exit_code == ExitCode.PASS
    report = json.loads(path.read_text(encoding='utf-8'))
    assert report['command'] == 'weyl'
    assert report['passed'] is True


def test_corrupted_connection_fails(runner, inputs_dir, tmp_path):
    result = runner.invoke(app, ['dictionary', '--input', str(inputs_dir / 'corrupted_connection.json'),
                                 '--output', str(tmp_path / 'dictionary.json')])
    assert result.exit_code == ExitCode.CHECK_FAILED


def test_invalid_family_is_an_input_error(runner, inputs_dir):
    result = runner.invoke(app, ['gaussmanin', '--input', str(inputs_dir / 'nonintegrable_twist.json')])
    assert result.exit_code == ExitCode.INPUT_ERROR


def test_degree_cap_limit(runner):
    result = runner.invoke(app, ['homalg', '--degree-cap', '99'])
    assert result.exit_code == ExitCode.INPUT_ERROR


def test_missing_input_file(runner, tmp_path):
    result = runner.invoke(app, ['pullback', '--input', str(tmp_path / 'absent.json')])
    assert result.exit_code == ExitCode.INPUT_ERROR
