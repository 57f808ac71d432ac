# Trace files, CSV export and run manifests
