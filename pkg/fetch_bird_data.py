#!/usr/bin/env python3
"""
Download the public bird flight-direction deposit (figshare, DOI 10.6084/m9.figshare.3123100.v2).

The files are saved unchanged; inspect them and point ``circmode --input ... --column ...``
at the direction column. The deposit is CC BY 4.0 and is not vendored in this repository.
"""
import argparse
import sys
from pathlib import Path

import requests

ARTICLE_URL = "https://api.figshare.com/v2/articles/3123100/versions/2"


def parse_arguments(argv=None):
    """Parse command line arguments."""
    parser = argparse.ArgumentParser(description="Fetch the bird flight-direction dataset from figshare.")
    parser.add_argument("--dest", default="data/birds", help="Directory to save the files in")
    parser.add_argument("--timeout", type=float, default=30.0, help="HTTP timeout in seconds")
    return parser.parse_args(argv)


def list_files(timeout):
    response = requests.get(ARTICLE_URL, timeout=timeout)
    response.raise_for_status()
    return response.json().get("files", [])


def download(entry, dest, timeout):
    target = dest / entry["name"]
    with requests.get(entry["download_url"], timeout=timeout, stream=True) as response:
        response.raise_for_status()
        with target.open("wb") as handle:
            for chunk in response.iter_content(chunk_size=1 << 16):
                handle.write(chunk)
    return target


def main(argv=None):
    args = parse_arguments(argv)
    dest = Path(args.dest)
    dest.mkdir(parents=True, exist_ok=True)
    try:
        files = list_files(args.timeout)
    except requests.RequestException as e:
        print(f"Error: could not reach figshare: {e}")
        sys.exit(1)
    if not files:
        print("The figshare record lists no files.")
        sys.exit(1)
    for entry in files:
        try:
            target = download(entry, dest, args.timeout)
        except requests.RequestException as e:
            print(f"Error downloading '{entry.get('name')}': {e}")
            sys.exit(1)
        print(f"Saved {target} ({target.stat().st_size} bytes)")


if __name__ == "__main__":
    main()
