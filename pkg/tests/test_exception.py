from __future__ import annotations

import pytest

from masonryhom.exception import (
    AuditError,
    ConfigError,
    GeometryError,
    InputError,
    MasonryHomError,
    SolverError,
    exit_code_for,
    report_error,
)


def test_hierarchy():
    assert issubclass(InputError, ValueError)
    assert issubclass(ConfigError, InputError)
    for cls in (InputError, GeometryError, SolverError, AuditError):
        assert issubclass(cls, MasonryHomError)


def test_solver_error_carries_diagnostics():
    err = SolverError('ADMM stalled', {'rho': 2.0, 'iterations': 10})
    assert str(err) == 'ADMM stalled [iterations=10, rho=2.0]'
    assert err.diagnostics['rho'] == 2.0
    assert str(SolverError('plain')) == 'plain'


def test_audit_error_lists_offending_samples():
    err = AuditError('2 violations', [{'index': 0}, {'index': 3}])
    assert len(err.offending) == 2
    assert AuditError('none').offending == []


class Recorder:
    def __init__(self) -> None:
        self.lines: list[tuple[str, str]] = []

    def __getattr__(self, level: str):
        return lambda message: self.lines.append((level, message))


@pytest.fixture
def recorder(monkeypatch) -> Recorder:
    rec = Recorder()
    monkeypatch.setattr('masonryhom.exception.mylog', rec)
    return rec


def test_report_error_logs_type_and_context(recorder):
    report_error(GeometryError('floating block detected'), 'masonryhom cell')
    assert recorder.lines == [('error', 'masonryhom cell | GeometryError: floating block detected')]


def test_report_error_lists_solver_diagnostics(recorder):
    report_error(SolverError('NaN detected in ADMM iterates', {'rho': 2.0, 'iteration': 40}))
    assert [line for level, line in recorder.lines if level == 'debug'] == ['diagnostic iteration = 40', 'diagnostic rho = 2.0']


def test_report_error_previews_audit_offenders(recorder):
    report_error(AuditError('5 violations', [{'index': i} for i in range(5)]), 'audit')
    warning = next(line for level, line in recorder.lines if level == 'warning')
    assert warning.startswith('audit | 5 offending sample(s)')
    assert warning.endswith('(+2 more)')


def test_report_error_traceback_on_request(recorder):
    try:
        raise InputError('bad xi')
    except InputError as err:
        report_error(err, log_traceback=True)
    assert len(recorder.lines) == 2
    assert 'raise InputError' in recorder.lines[1][1]


@pytest.mark.parametrize(
    ('exc', 'code'),
    [(InputError('x'), 2), (ConfigError('x'), 2), (SolverError('x'), 3), (GeometryError('x'), 1), (AuditError('x'), 1), (RuntimeError('x'), 1)],
)
def test_exit_codes(exc, code):
    assert exit_code_for(exc) == code
