# Copyright 2026 The Hearthcast Authors.
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""End-to-end check of `hearthcast serve`: HTTP routes, SIGHUP reload and
clean shutdown. Usage: serve_reload_test.py <path to hearthcast>"""

import json
import os
import shutil
import signal
import subprocess
import sys
import tempfile
import time
import urllib.error
import urllib.request

HOUSE = {
    "surface_m2": 70, "heating_type": "gas", "water_heating_type": "gas",
    "cooking_type": "gas", "occupants": 2, "house_type": "apartment",
    "tariff_index": "base", "max_power_kva": 6,
}


def request(port, path, body=None):
    data = None if body is None else json.dumps(body).encode()
    req = urllib.request.Request(
        f"http://127.0.0.1:{port}{path}", data=data,
        headers={"Content-Type": "application/json"})
    try:
        with urllib.request.urlopen(req, timeout=10) as res:
            return res.status, json.loads(res.read())
    except urllib.error.HTTPError as e:
        return e.code, json.loads(e.read() or b"{}")


def run(tool, *args):
    subprocess.run([tool, *args], check=True, stdout=subprocess.DEVNULL)


def wait_for(stream, text):
    deadline = time.time() + 30
    while time.time() < deadline:
        line = stream.readline()
        if text in line:
            return line
    raise AssertionError(f"no '{text}' from server")


def main(tool):
    work = tempfile.mkdtemp(prefix="hearthcast_serve_")
    try:
        data = os.path.join(work, "data.csv")
        run(tool, "gen", "--n", "1000", "--seed", "2", "--out", data)
        legacy = os.path.join(work, "legacy.json")
        tree = os.path.join(work, "tree.json")
        run(tool, "train", "--data", data, "--kind", "legacy", "--out", legacy)
        run(tool, "train", "--data", data, "--kind", "constrained_tree", "--out", tree)
        active = os.path.join(work, "active.json")
        shutil.copy(legacy, active)

        proc = subprocess.Popen([tool, "serve", "--model", active, "--port", "0"],
                                stdout=subprocess.PIPE, stderr=subprocess.PIPE, text=True)
        try:
            port = int(wait_for(proc.stdout, "listening on").rsplit(":", 1)[1])
            assert request(port, "/v1/model")[1]["kind"] == "legacy"
            status, body = request(port, "/v1/predict", HOUSE)
            assert status == 200 and "monthly_installment_eur" in body, body
            assert request(port, "/v1/explain", HOUSE)[0] == 409
            assert request(port, "/v1/predict", dict(HOUSE, surface_m2=-1))[0] == 422

            shutil.copy(tree, active)
            proc.send_signal(signal.SIGHUP)
            wait_for(proc.stdout, "model reloaded")
            assert request(port, "/v1/model")[1]["kind"] == "constrained_tree"
            assert request(port, "/v1/explain", HOUSE)[0] == 200

            with open(active, "w") as f:
                f.write("not a model")
            proc.send_signal(signal.SIGHUP)
            wait_for(proc.stderr, "reload failed")
            assert request(port, "/v1/model")[1]["kind"] == "constrained_tree"

            proc.send_signal(signal.SIGTERM)
            assert proc.wait(timeout=10) == 0
        finally:
            if proc.poll() is None:
                proc.kill()
    finally:
        shutil.rmtree(work, ignore_errors=True)
    print("serve reload ok")


if __name__ == "__main__":
    main(sys.argv[1])
