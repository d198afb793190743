# Verification module — acceptance criteria
