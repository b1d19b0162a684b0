"""The ten acceptance criteria at their stated tolerances and time limits.

Each test prints one ``[PASS]``/``[FAIL]`` line; the lines are repeated in
the terminal summary.  ``fractal-langevin validate`` runs the same checks.
"""

import pytest

from fractal_langevin.validation import CRITERIA

from conftest import ACCEPTANCE_LINES


@pytest.mark.parametrize("criterion", CRITERIA, ids=[f"criterion_{c.number}" for c in CRITERIA])
def test_criterion(criterion):
    result = criterion()
    line = result.line()
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert result.passed, line
