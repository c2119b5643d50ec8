import pathlib

import pytest

from splashkit.library import load_library
from splashkit.schema import load_schemas

FIXTURES = pathlib.Path(__file__).parent / "fixtures"
DATA_DIR = pathlib.Path(__file__).parent.parent / "src" / "splashkit" / "data"

SCHEMAS_PATH = FIXTURES / "schemas.json"
DATASET_PATH = FIXTURES / "sample_dataset.jsonl"
BEAMS_PATH = FIXTURES / "beams.jsonl"
TEMPLATES_PATH = DATA_DIR / "starter_templates.txt"


@pytest.fixture(scope="session")
def schemas():
    return load_schemas(str(SCHEMAS_PATH))


@pytest.fixture(scope="session")
def school(schemas):
    return schemas["school_db"]


@pytest.fixture(scope="session")
def race(schemas):
    return schemas["race_db"]


@pytest.fixture(scope="session")
def shop(schemas):
    return schemas["shop_db"]


@pytest.fixture(scope="session")
def library():
    return load_library(str(TEMPLATES_PATH))
