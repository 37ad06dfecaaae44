from .phase_grid import PhaseGrid, scan, region_area, containment, lobe_detector
