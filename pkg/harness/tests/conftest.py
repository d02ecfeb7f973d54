import pytest

# the primary suite must run standalone; skip these tests when the
# evaluation harness package is not installed
pytest.importorskip("sacharness", reason="sacharness not installed")
