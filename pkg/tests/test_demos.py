import runpy
from pathlib import Path

import pytest

DEMOS = Path(__file__).resolve().parent.parent / "demos"

DAT = """\
ID   cel-let-7         standard; RNA; CEL; 99 BP.
FT   miRNA           17..38
FT                   /accession="MIMAT0000001"
FT                   /product="cel-let-7-5p"
FT   miRNA           60..81
FT                   /accession="MIMAT0015091"
FT                   /product="cel-let-7-3p"
//
ID   cel-lin-4         standard; RNA; CEL; 94 BP.
FT   miRNA           16..36
FT                   /product="cel-lin-4-5p"
//
"""


@pytest.mark.parametrize("script", sorted(p.name for p in DEMOS.glob("plot_*.py")))
def test_demo_runs(script, capsys):
    runpy.run_path(str(DEMOS / script), run_name="__main__")
    assert capsys.readouterr().out


def test_mirbase_dat_conversion():
    mod = runpy.run_path(str(DEMOS / "mirbase_annotations.py"))
    anns = list(mod["parse_dat"](DAT.splitlines()))
    assert [(a.precursor_id, a.mature_id, a.start, a.end) for a in anns] == [
        ("cel-let-7", "cel-let-7-5p", 17, 38),
        ("cel-let-7", "cel-let-7-3p", 60, 81),
        ("cel-lin-4", "cel-lin-4-5p", 16, 36),
    ]
