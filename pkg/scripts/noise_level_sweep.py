"""Stage SNRs (received, DC added, denoised) over uniform noise amplitudes.

    python scripts/noise_level_sweep.py --levels 0.5,1,2,4,8 --workers 4
"""
import argparse
from pathlib import Path

from syncdenoise.config import ExperimentConfig
from syncdenoise.harness import sweep_noise_levels


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--levels", default="1,2,4,8")
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", default="out/sweep.csv")
    args = ap.parse_args()

    levels = [float(v) for v in args.levels.split(",")]
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    rows = sweep_noise_levels(levels, ExperimentConfig(), workers=args.workers, path=args.out)
    print("level  stage1  stage2  stage3")
    for r in rows:
        print(f"{r['level']:5.2f} {r['stage1']:7.2f} {r['stage2']:7.2f} {r['stage3']:7.2f}")


if __name__ == "__main__":
    main()
