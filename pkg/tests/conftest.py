import warnings

import pytest

from cknlab.errors import OutsideFSWarning


@pytest.fixture(autouse=True)
def _quiet_fs_warnings():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", OutsideFSWarning)
        yield
