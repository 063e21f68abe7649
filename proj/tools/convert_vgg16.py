#!/usr/bin/env python3
"""Convert a torchvision VGG16 state dict into an lle checkpoint archive.

Usage: convert_vgg16.py vgg16-397923af.pth vgg16.ckpt

See docs/vgg16-weights.md for the name mapping and docs/checkpoint-format.md
for the archive layout.
"""

import json
import struct
import sys

CONV_NAMES = {
    0: "conv1_1", 2: "conv1_2",
    5: "conv2_1", 7: "conv2_2",
    10: "conv3_1", 12: "conv3_2", 14: "conv3_3",
    17: "conv4_1", 19: "conv4_2", 21: "conv4_3",
    24: "conv5_1", 26: "conv5_2", 28: "conv5_3",
}

MAGIC = b"LLECKPT1"


def fnv1a64(s: str) -> int:
    h = 0xCBF29CE484222325
    for ch in s.encode():
        h ^= ch
        h = (h * 0x100000001B3) & 0xFFFFFFFFFFFFFFFF
    return h


def main() -> int:
    if len(sys.argv) != 3:
        print(__doc__, file=sys.stderr)
        return 1
    src, dst = sys.argv[1], sys.argv[2]

    import torch  # deferred so --help style failures don't need it

    state = torch.load(src, map_location="cpu", weights_only=True)

    entries = []  # (name, shape, float32 bytes)
    for idx in sorted(CONV_NAMES):
        name = CONV_NAMES[idx]
        weight = state[f"features.{idx}.weight"]  # [cout, cin, kh, kw]
        bias = state[f"features.{idx}.bias"]
        kernel = weight.permute(2, 3, 1, 0).contiguous().float()  # [kh,kw,cin,cout]
        entries.append((f"{name}.w", list(kernel.shape), kernel.numpy().tobytes()))
        entries.append((f"{name}.b", [bias.shape[0]], bias.float().numpy().tobytes()))

    arch = "vgg16:conv13"
    manifest = {
        "meta": {
            "arch": arch,
            "arch_hash": f"{fnv1a64(arch):016x}",
            "source": "torchvision vgg16 IMAGENET1K_V1",
        },
        "tensors": [],
    }
    offset = 0
    for name, shape, blob in entries:
        manifest["tensors"].append(
            {"name": name, "dtype": "f32", "shape": shape,
             "offset": offset, "size": len(blob)}
        )
        offset += len(blob)

    blob = json.dumps(manifest, sort_keys=True).encode()
    with open(dst, "wb") as out:
        out.write(MAGIC)
        out.write(struct.pack("<Q", len(blob)))
        out.write(blob)
        for _, _, data in entries:
            out.write(data)
    print(f"wrote {dst}: {len(entries)} tensors, {offset} payload bytes")
    return 0


if __name__ == "__main__":
    sys.exit(main())
