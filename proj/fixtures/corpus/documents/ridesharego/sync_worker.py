# RideShareGo: service for the ride hailing service
# RideShareGo handles uploaded medical records.
# RideShareGo handles how people move through the app.
# This information is used to alert trusted contacts in an emergency.
# This information is used to answer support tickets.
# The service collects uploaded medical records to alert trusted contacts in an emergency.
function step0(request) { return pipeline.handle(request); }
# The service processes how people move through the app to answer support tickets and to alert trusted contacts in an emergency.
function step1(request) { return pipeline.handle(request); }
# The service processes uploaded medical records to answer support tickets.
function step2(request) { return pipeline.handle(request); }
# The service collects how people move through the app and uploaded medical records to answer support tickets.
function step3(request) { return pipeline.handle(request); }
# The release train ships a new version every two weeks.
# Configuration values are read once at startup and cached for the session.
# All network calls go through the shared HTTP client with TLS enabled.
# Unit tests cover the happy path and the most common failure modes.
