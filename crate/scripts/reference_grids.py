"""Regenerate the single-sided reference grids under crates/core/tests/golden.

Grids come from independent encoders (segno, and ZXing-C++ when installed)
and are stored as 21 lines of 0/1 (1 = dark), named
<encoder>_<mode>_<mask>_<hex of text>.txt, so the Rust encoder can be
compared against them bit for bit.

segno pads an already byte-aligned bit stream with a whole extra zero byte,
which every byte-mode Version 1 symbol hits; byte-mode references therefore
come from ZXing-C++ only.
"""

import pathlib

import segno

OUT = pathlib.Path(__file__).resolve().parent.parent / "crates/core/tests/golden"

SEGNO_CASES = [("HELLO", "alphanumeric", m) for m in range(8)] + [
    ("HARRY", "alphanumeric", 3),
    ("BOVIK", "alphanumeric", 3),
    ("01234567", "numeric", 0),
    ("8675309", "numeric", 5),
    ("QR CODE $%*+-./:", "alphanumeric", 7),
]

ZXING_CASES = [
    ("hello world", "byte", 6),
    ("Duplex", "byte", 0),
    ("HELLO", "alphanumeric", 3),
    ("31415926535", "numeric", 7),
]


def write(prefix, text, mode, mask, rows):
    assert len(rows) == 21 and all(len(r) == 21 for r in rows)
    name = f"{prefix}_{mode}_{mask}_{text.encode().hex()}.txt"
    (OUT / name).write_text("\n".join(rows) + "\n")
    print(name)


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for text, mode, mask in SEGNO_CASES:
        qr = segno.make_qr(text, error="l", version=1, mode=mode, mask=mask, boost_error=False)
        assert qr.version == 1 and qr.error == "L" and qr.mask == mask
        write("segno", text, mode, mask, ["".join("1" if v else "0" for v in row) for row in qr.matrix])
    try:
        import numpy as np
        import zxingcpp
    except ImportError:
        print("zxing-cpp not installed; skipping its references")
        return
    for text, mode, mask in ZXING_CASES:
        code = zxingcpp.create_barcode(text, zxingcpp.BarcodeFormat.QRCode, ec_level="L", version=1, data_mask=mask)
        image = np.array(zxingcpp.write_barcode_to_image(code, scale=1, add_quiet_zones=False))
        write("zxing", text, mode, mask, ["".join("1" if v < 128 else "0" for v in row) for row in image])


if __name__ == "__main__":
    main()
