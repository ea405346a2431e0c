# FitTrack: service for the fitness tracker
# FitTrack handles short voice notes.
# FitTrack handles photos selected from the gallery.
# This information is used to suggest content the user may like.
# This information is used to verify who is signing in.
# This information is used to send reminders and alerts.
# The service collects photos selected from the gallery to send reminders and alerts.
function step0(request) { return pipeline.handle(request); }
# The service collects short voice notes to suggest content the user may like.
function step1(request) { return pipeline.handle(request); }
# The service collects short voice notes to suggest content the user may like and to send reminders and alerts.
function step2(request) { return pipeline.handle(request); }
# The service processes short voice notes to verify who is signing in.
function step3(request) { return pipeline.handle(request); }
# The module follows the layered design used across the rest of the codebase.
# The release train ships a new version every two weeks.
# The team reviews every change before it is merged.
# Feature flags gate the rollout of new screens to a small share of users.
