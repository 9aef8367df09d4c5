import json
from pathlib import Path

import pytest

from edaguide import load_table, mine_all

DATA_DIR = Path(__file__).parent / "data"
GOLDEN_DIR = Path(__file__).parent / "golden"

CARS_ROOT_ID = "extremum|Year|mean(Horsepower)||lowest"


@pytest.fixture(scope="session")
def cars_csv_path() -> Path:
    return DATA_DIR / "cars.csv"


@pytest.fixture(scope="session")
def cars_table(cars_csv_path):
    return load_table(cars_csv_path.read_bytes(), name="cars")


@pytest.fixture(scope="session")
def cars_space(cars_table):
    return mine_all(cars_table)


@pytest.fixture(scope="session")
def toy_csv_path() -> Path:
    return DATA_DIR / "toy.csv"


@pytest.fixture(scope="session")
def toy_table(toy_csv_path):
    return load_table(toy_csv_path.read_bytes(), name="toy")


@pytest.fixture(scope="session")
def toy_space(toy_table):
    return mine_all(toy_table)


def load_json(path: Path):
    return json.loads(path.read_text(encoding="utf-8"))
