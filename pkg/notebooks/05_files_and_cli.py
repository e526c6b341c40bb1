# %% [markdown]
# # Files, manifests and the command line
#
# Matrices are stored as text (a `rows cols` header and one line of 0/1 per
# row) or as packed binary. Every command that writes files also writes a
# manifest with its arguments, seeds and SHA-256 digests.

# %%
import tempfile
from pathlib import Path

from dsrgkron import catalog
from dsrgkron.cli import main
from dsrgkron.fileio import read_manifest, read_matrix, to_binary, write_matrix

work = Path(tempfile.mkdtemp())
spec = catalog.load_fixture(1)

# %%
path = write_matrix(work / "a1.txt", spec.a1, comments=["dsrg(6,3,2,1,2) seed"])
print(path.read_text())
print(len(to_binary(spec.a1)), "bytes in binary form")

# %% [markdown]
# The same steps through the `dsrgkron` command (called in-process here).

# %%
main(["params", "6", "3", "2", "1", "--n", "1", "2", "3", "4"])
main(["search-seed", "6", "3", "2", "1", "2", "--out", str(work / "seed.txt")])
main(["search-pair", "--seed", str(work / "seed.txt"), "2", "1",
      "--out-b", str(work / "b1.txt"), "--out-c", str(work / "c1.txt")])
main(["build", "2", "1", "--seed", str(work / "seed.txt"), "--b", str(work / "b1.txt"),
      "--c", str(work / "c1.txt"), "--n", "4", "--out", str(work / "family")])

# %%
for key, value in read_manifest(work / "family" / "build.manifest").items():
    print(f"{key:28s} {value}")

# %%
main(["verify", "--matrix", str(work / "family" / "A_3.txt"), "120", "15", "2", "1", "2"])
print(read_matrix(work / "family" / "A_4.txt").shape)
