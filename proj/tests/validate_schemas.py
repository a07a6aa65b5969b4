# Copyright 2026 The gapsieve Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Runs every JSON-emitting subcommand and validates its output against the published schema."""

import json
import pathlib
import subprocess
import sys
import tempfile

import jsonschema


def main() -> int:
    binary, schema_dir = str(pathlib.Path(sys.argv[1]).resolve()), pathlib.Path(sys.argv[2])
    schemas = {p.name.removesuffix(".schema.json"): json.loads(p.read_text()) for p in schema_dir.glob("*.schema.json")}
    for s in schemas.values():
        jsonschema.Draft202012Validator.check_schema(s)

    with tempfile.TemporaryDirectory() as tmp:
        tmp = pathlib.Path(tmp)
        (tmp / "bad.json").write_text('{"offsets":[0,2,4]}')
        (tmp / "lab.json").write_text('{"tuple":[0,2,6],"N":20000,"varpi":"1/3","l":1,"B":null}')
        (tmp / "lab2.json").write_text('{"tuple":[0],"N":20000,"varpi":"1/4","l":1,"B":"infinity",'
                                       '"congruence_mode":"extra_congruence","a3":{"sample_ds":[1,5],"decades":2}}')
        built = tmp / "t.json"
        runs = [
            (["primes", "count", "1e6"], 0),
            (["primes", "nth", "1000"], 0),
            (["primes", "list", "0", "100"], 0),
            (["arith", "tau", "720"], 0),
            (["arith", "mobius", "30"], 0),
            (["arith", "phi", "720"], 0),
            (["arith", "omega", "720"], 0),
            (["arith", "bigomega", "720"], 0),
            (["arith", "factor", "999999999989"], 0),
            (["arith", "almost-prime", "30", "--B", "16"], 0),
            (["tuple", "build", "--k", "20", "--start", "100", "--out", str(built)], 0),
            (["tuple", "build", "--k", "3", "--start", "10"], 0),
            (["tuple", "verify", str(built)], 0),
            (["tuple", "verify", str(tmp / "bad.json"), "--mode", "sampled"], 2),
            (["tuple", "normalize", str(built)], 0),
            (["tuple", "sseries", str(built), "--cutoff", "10000"], 0),
            (["constants", "verify"], 0),
            (["constants", "verify", "--k", "1000"], 2),
            (["--precision", "113", "constants", "verify"], 0),
            (["constants", "optimize", "--budget", "100"], 0),
            (["lab", "run", "--config", str(tmp / "lab.json")], 0),
            (["lab", "run", "--config", str(tmp / "lab2.json")], 0),
            (["verify-theorem", "--ceiling", "1e6"], 1),
            (["verify-theorem", "--k", "2000", "--start", "2000", "--prefix", "2000", "--varpi", "1/584"], 2),
        ]
        seen, failures = set(), 0
        for args, want in runs:
            proc = subprocess.run([binary, "--json", *args], capture_output=True, text=True, cwd=tmp)
            label = " ".join(args)
            if proc.returncode != want:
                print(f"FAIL {label}: exit {proc.returncode}, expected {want}\n{proc.stderr}")
                failures += 1
                continue
            doc = json.loads(proc.stdout)
            name = doc.get("schema")
            if name not in schemas:
                print(f"FAIL {label}: unknown schema {name!r}")
                failures += 1
                continue
            seen.add(name)
            errors = list(jsonschema.Draft202012Validator(schemas[name]).iter_errors(doc))
            for e in errors:
                print(f"FAIL {label}: {list(e.absolute_path)}: {e.message[:200]}")
            failures += bool(errors)
            if not errors:
                print(f"ok   {label} -> {name}")
        unused = sorted(set(schemas) - seen)
        if unused:
            print(f"FAIL schemas never exercised: {unused}")
            failures += 1
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
