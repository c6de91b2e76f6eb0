#!/usr/bin/env python3
"""Prepend the Apache-2.0 header to every C++ source that lacks it."""
import pathlib
import sys

HEADER = """// Copyright 2026 The wbcbench Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

"""


def main(root: pathlib.Path) -> int:
    changed = 0
    for sub in ("include", "src", "tests", "tools"):
        for path in sorted((root / sub).rglob("*")):
            if path.suffix not in (".hpp", ".cpp"):
                continue
            text = path.read_text()
            if text.startswith("// Copyright 2026 The wbcbench Authors."):
                continue
            path.write_text(HEADER + text)
            changed += 1
    print(f"added headers to {changed} files")
    return 0


if __name__ == "__main__":
    sys.exit(main(pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else pathlib.Path(__file__).resolve().parent.parent)))
