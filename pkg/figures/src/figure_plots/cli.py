"""Render one figure from a directory of entwit CSV outputs.

Usage: entwit-figures FIGURE_ID --in DIR --out IMAGE
"""

import argparse
import sys
from pathlib import Path

from .render import LAYOUTS, FigureDataError, render_figure


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="entwit-figures")
    parser.add_argument("which", choices=sorted(LAYOUTS), help="figure id")
    parser.add_argument("--in", dest="input_dir", type=Path, required=True,
                        help="directory holding the figure's CSV files")
    parser.add_argument("--out", type=Path, required=True,
                        help="output image path (extension picks the format)")
    args = parser.parse_args(argv)
    try:
        summary = render_figure(args.which, args.input_dir, args.out)
    except FigureDataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {summary.output_path} "
          f"({summary.panel_count} panel(s), {summary.series_count} series)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
