# Channel models: Doppler noise, eigen-domain generators and deterministic classes
