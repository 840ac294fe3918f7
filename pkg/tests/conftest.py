import json
from importlib import resources
from pathlib import Path

import jsonschema
import pytest

FIXTURES = Path(__file__).parent / "fixtures"


def validate_against(schema_name: str, payload: dict) -> None:
    schema = json.loads(
        resources.files("vertext").joinpath(f"schemas/{schema_name}.json").read_text("utf-8")
    )
    jsonschema.validate(payload, schema)


@pytest.fixture
def schema_check():
    return validate_against
