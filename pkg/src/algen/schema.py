"""Access to the JSON schemas shipped with the package."""

import json
from functools import lru_cache
from importlib.resources import files


@lru_cache(maxsize=None)
def load_schema(name: str) -> dict:
    return json.loads(files("algen").joinpath("schemas", f"{name}.json").read_text())


def schema_names() -> list[str]:
    return sorted(p.name[:-5] for p in files("algen").joinpath("schemas").iterdir()
                  if p.name.endswith(".json"))
