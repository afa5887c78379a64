"""Per-frame FLOP counts of every estimator at the default frame size."""

import argparse

from jcas_track.scenario import complexity_table
from jcas_track.waveform import OfdmConfig


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--pad", type=int, default=16)
    args = p.parse_args()
    table = complexity_table(OfdmConfig(), args.pad)
    base = table["RDM"]
    for name, flops in table.items():
        print(f"{name:<10} {flops:>14,d}  {flops / base:6.2f} x RDM")


if __name__ == "__main__":
    main()
