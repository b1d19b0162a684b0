"""
Config-driven runs
==================

The same pipeline the ``fractal-langevin run`` command uses: a JSON config
is validated, simulated, analyzed, and summarized in a manifest.
"""

import json
from pathlib import Path

from fractal_langevin.errors import SchemaError
from fractal_langevin.pipeline import bundled_config, parse_config, run_pipeline

cfg_path = bundled_config("koch-gaussian.json")
print(Path(str(cfg_path)).read_text())

manifest = run_pipeline(str(cfg_path), "pipeline-out")
print("passed:", manifest.passed)
for name, rep in manifest.reports.items():
    print(f"  {name}: {rep['value']:.5f} vs {rep['critical_value_or_tolerance']:.5f}")
for f in manifest.files:
    print(f"  {f['path']:16s} {f['sha256'][:16]}")

# Bad configs are rejected before anything runs, naming the offending key.
raw = json.loads(Path(str(cfg_path)).read_text())
raw["noise"]["mu"] = 3
try:
    parse_config(raw)
except SchemaError as exc:
    print("rejected:", exc.path, "->", exc.detail)
