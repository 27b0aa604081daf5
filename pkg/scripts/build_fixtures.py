"""Regenerate the canonical robot fixture documents under src/probaction/data/."""

from pathlib import Path

from probaction.model_io import serialize_model
from probaction.robot import BUILDERS, FIXTURES

DATA = Path(__file__).resolve().parents[1] / "src" / "probaction" / "data"


def main():
    DATA.mkdir(exist_ok=True)
    for name, build in BUILDERS.items():
        path = DATA / FIXTURES[name]
        path.write_text(serialize_model(build()), encoding="utf-8")
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
