# 6-cycle L0R0 L0R1 L1R1 L1R2 L2R2 L2R0 as three induced matchings of size 2
svc-rs 1
side 3
rs-edge 0 0
rs-edge 0 1
rs-edge 1 1
rs-edge 1 2
rs-edge 2 2
rs-edge 2 0
matching 0 3
matching 2 5
matching 4 1
