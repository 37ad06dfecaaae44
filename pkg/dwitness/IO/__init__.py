from .records import RunManifest, write_scan_outputs, read_grid_csv
