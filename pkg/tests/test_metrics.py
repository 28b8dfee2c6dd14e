"""Tests for Prometheus metrics."""

from pathlib import Path

from src.metrics import (
    get_metrics,
    identity_checks_total,
    series_evaluations_total,
    series_truncations_total,
    verification_duration_seconds,
    verifications_total,
    write_metrics,
)


def test_get_metrics() -> None:
    """Test metrics generation returns valid Prometheus format."""
    series_evaluations_total.labels(function="tricomi_c0").inc()
    series_truncations_total.labels(function="mittag_leffler").inc()
    verifications_total.labels(equation="burgers-laguerre", mode="exact-time", outcome="pass").inc()
    verification_duration_seconds.labels(mode="fd").observe(0.4)
    identity_checks_total.labels(block="lowering", status="pass").inc()

    metrics = get_metrics()

    assert isinstance(metrics, bytes)
    metrics_str = metrics.decode("utf-8")
    assert "series_evaluations_total" in metrics_str
    assert "series_truncations_total" in metrics_str
    assert "verifications_total" in metrics_str
    assert "verification_duration_seconds" in metrics_str
    assert "identity_checks_total" in metrics_str


def test_metrics_are_singletons() -> None:
    """Test that metrics are module-level singletons."""
    from src import metrics

    assert metrics.series_evaluations_total is series_evaluations_total
    assert metrics.verifications_total is verifications_total
    assert metrics.identity_checks_total is identity_checks_total


def test_write_metrics(tmp_path: Path) -> None:
    verifications_total.labels(equation="kdv-laguerre", mode="exact-time", outcome="fail").inc()
    target = tmp_path / "run.prom"

    write_metrics(target)

    assert 'equation="kdv-laguerre"' in target.read_text()
