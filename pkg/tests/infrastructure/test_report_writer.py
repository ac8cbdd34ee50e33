# tests/infrastructure/test_report_writer.py
from domain.entities.metric_report import MetricReport
from infrastructure.report_writer import read_loss_history, write_loss_history, write_metric_report


def test_loss_history(tmp_path):
    write_loss_history(tmp_path / "loss.csv", [0.5, 0.25])
    lines = (tmp_path / "loss.csv").read_text().splitlines()
    assert lines == ["epoch,loss", "1,0.5", "2,0.25"]
    assert read_loss_history(tmp_path / "loss.csv") == [0.5, 0.25]


def test_empty_loss_history(tmp_path):
    write_loss_history(tmp_path / "loss.csv", [])
    assert read_loss_history(tmp_path / "loss.csv") == []


def test_metric_report(tmp_path):
    perfect = MetricReport(mae=0.0, rmse=0.0, imae=0.0, irmse=0.0, delta1=1.0, delta2=1.0, delta3=1.0)
    write_metric_report(tmp_path / "m.csv", [perfect, perfect])
    lines = (tmp_path / "m.csv").read_text().splitlines()
    assert lines[0] == "mae,rmse,imae,irmse,delta1,delta2,delta3"
    assert lines[1] == "0.0,0.0,0.0,0.0,1.0,1.0,1.0"
    assert len(lines) == 3
