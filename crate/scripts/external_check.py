"""Decode double-sided symbols with independent QR readers.

Builds each case with the release CLI, then asks OpenCV and ZXing-C++
(whichever are installed) to read the image as printed and transposed.
Exits non-zero if any available reader disagrees with the expected text.

    python3 scripts/external_check.py
"""

import pathlib
import subprocess
import sys
import tempfile

import numpy as np

ROOT = pathlib.Path(__file__).resolve().parent.parent
CASES = [
    (["HARRY", "BOVIK"], "HARRY", "BOVIK"),
    (["HI", "OK", "--method", "brute", "--trials", "1000000", "--seed", "0"], "HI", "OK"),
    (["HELLO", "WORLD"], "HELLO", "WORLD"),
    (["12345", "12345"], "12345", "12345"),
    (["DOUBLE88", "QR-CODE-V1L"], "DOUBLE88", "QR-CODE-V1L"),
]


def readers():
    out = {}
    try:
        import cv2

        det = cv2.QRCodeDetector()
        out["opencv"] = lambda img: det.detectAndDecode(img)[0] or None
    except ImportError:
        pass
    try:
        import zxingcpp

        def zx(img):
            found = zxingcpp.read_barcodes(img)
            return found[0].text if found else None

        out["zxing-cpp"] = zx
    except ImportError:
        pass
    return out


def load_pbm(path):
    tokens = path.read_text().split()
    assert tokens[0] == "P1"
    width, height = int(tokens[1]), int(tokens[2])
    pixels = "".join(tokens[3:])
    data = [0 if c == "1" else 255 for c in pixels]
    return np.array(data, dtype=np.uint8).reshape(height, width)


def main():
    available = readers()
    if not available:
        print("no external reader installed (pip install opencv-python-headless zxing-cpp)")
        return 1
    subprocess.run(["cargo", "build", "--release", "-q", "-p", "duplex-qr-cli"], cwd=ROOT, check=True)
    exe = ROOT / "target/release/duplex-qr"
    failures = 0
    with tempfile.TemporaryDirectory() as tmp:
        for args, want_a, want_b in CASES:
            out = pathlib.Path(tmp) / "symbol.pbm"
            subprocess.run([str(exe), "mirror", *args, "-o", str(out)], check=True, capture_output=True)
            image = load_pbm(out)
            views = {"straight": image, "transposed": np.ascontiguousarray(image.T)}
            for name, read in available.items():
                got_a, got_b = read(views["straight"]), read(views["transposed"])
                ok = (got_a, got_b) == (want_a, want_b)
                failures += not ok
                print(f"{'ok  ' if ok else 'FAIL'} {name:10} {args[0]!r}/{args[1]!r}: read {got_a!r} / {got_b!r}")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
