# Scenario evaluation, statistics and the acceptance suite
