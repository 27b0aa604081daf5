"""Walk the robot example through both projection algorithms and print what changes.

    python scripts/robot_projection.py [--dot-dir out/]
"""

import argparse
from pathlib import Path

from probaction import export_dot, extract_successor, load_fixture, marginal, project_modified, project_original


def show(title, pr):
    print(f"== {title}")
    for t in pr.transitions:
        print(f"  slice {t.slice} ({t.action})")
        print(f"    direct    {sorted(t.direct_effects)}")
        print(f"    indirect  {sorted(t.indirect_effects)}")
        print(f"    persisted {sorted(t.persisted)}")
    for base, name in sorted(pr.latest.items()):
        dist = marginal(pr.combined, name)
        cells = "  ".join(f"{v[0]}={p:.4f}" for v, p in dist.items())
        print(f"  {name:<20} {cells}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--dot-dir", type=Path, help="write DOT files for each combined network here")
    args = ap.parse_args()

    state, pickup = load_fixture("figure1_state"), load_fixture("figure2_pickup")
    env, silent = load_fixture("figure3_env"), load_fixture("silent_move")

    runs = {"original": project_original(state, pickup), "modified": project_modified(state, pickup, env)}
    successor = extract_successor(runs["modified"])
    runs["original-then-silent"] = project_original(successor, silent)
    runs["modified-then-silent"] = project_modified(successor, silent, env)
    for title, pr in runs.items():
        show(title, pr)

    if args.dot_dir:
        args.dot_dir.mkdir(parents=True, exist_ok=True)
        for title, pr in runs.items():
            path = args.dot_dir / f"{title}.dot"
            path.write_text(export_dot(pr.combined))
            print(f"wrote {path}")


if __name__ == "__main__":
    main()
